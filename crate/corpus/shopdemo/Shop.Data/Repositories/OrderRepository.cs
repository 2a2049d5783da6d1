using System;
using System.Collections.Generic;
using System.Data;
using Shop.Business.Models;

namespace Shop.Data.Repositories
{
    public class OrderRepository
    {
        public int Save(Order order)
        {
            return DbHelper.Execute("usp_SaveOrder", order.Id);
        }

        public int Save(List<Order> orders)
        {
            int saved = 0;
            foreach (Order order in orders)
            {
                saved += Save(order);
            }
            return saved;
        }

        public List<Order> FindByCustomer(int customerId)
        {
            DataTable table = DbHelper.Query("usp_OrdersByCustomer", customerId);
            return Map(table);
        }

        public List<Order> FindOpen(int customerId)
        {
            DataTable table = DbHelper.Query("usp_OpenOrders", customerId);
            return Map(table);
        }

        private List<Order> Map(DataTable table)
        {
            List<Order> result = new List<Order>();
            foreach (DataRow row in table.Rows)
            {
                result.Add(new Order((int)row["CustomerId"]));
            }
            return result;
        }
    }
}
